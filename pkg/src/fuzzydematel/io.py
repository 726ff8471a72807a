"""Parsers for surveys, matrices and edge lists; JSON/CSV/DOT exporters.

All parsers take ``bytes`` or ``str`` and never touch the file system.

Survey CSV layout (one file, one block per expert)::

    #expert 1
    ,F1,F2
    F1,0,3
    F2,2,0
    #expert 2
    ...

Cells are integer ratings (crisp survey) or scale term labels (linguistic
survey). The kind is detected from the cells unless a ``#kind crisp`` or
``#kind linguistic`` line comes first. Other lines starting with ``#`` are
comments.

Matrix CSV: a header row of factor ids (optionally preceded by an empty
corner cell) and a square numeric body, each row optionally led by its id.

Edge-list CSV: ``source,target[,weight]`` rows, an optional header row, and
an optional ``#factors F1,F2,...`` line fixing the factor order.
"""

from __future__ import annotations

import csv
import json
import re
from decimal import ROUND_HALF_UP, Decimal
from io import StringIO

import numpy as np

from . import __version__
from .dematel import FactorSet, InfluenceMatrix
from .errors import DematelError, DiagonalError, OutOfRangeError, ParseError, UnknownTermError
from .fuzzy import DEFAULT_SCALE, LinguisticScale
from .graph import Edge, ImpactRelationMap
from .pipeline import AnalysisBundle
from .survey import CRISP, LINGUISTIC, ExpertSurvey

SCHEMA_VERSION = 1

_EXPERT_RE = re.compile(r"^#\s*expert\b\s*(.*)$", re.IGNORECASE)
_KIND_RE = re.compile(r"^#\s*kind\s*[:=]?\s*(\S+)\s*$", re.IGNORECASE)
_FACTORS_RE = re.compile(r"^#\s*factors\s*[:=]?\s*(.*)$", re.IGNORECASE)
_INT_RE = re.compile(r"^[+-]?\d+$")


def _text(data) -> str:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8 ({exc})") from exc
    if data.startswith("\ufeff"):
        data = data[1:]
    return data.replace("\r\n", "\n").replace("\r", "\n")


def _csv_row(line: str, lineno: int) -> list[str]:
    try:
        row = next(csv.reader([line]))
    except csv.Error as exc:
        raise ParseError(str(exc), lineno) from exc
    return [cell.strip() for cell in row]


def round_half_away(x: float, digits: int = 2) -> float:
    """Round to ``digits`` decimals with ties away from zero (2.675 -> 2.68)."""
    q = Decimal(repr(float(x))).quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_UP)
    return float(q) + 0.0


def _parse_float(cell: str, lineno: int, col: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise ParseError(f"non-numeric cell {cell!r}", lineno, col) from None
    if not np.isfinite(value):
        raise ParseError(f"non-finite cell {cell!r}", lineno, col)
    return value


def _square_block(rows: list[tuple[int, list[str]]]):
    """Split a header row plus body rows into ids and a grid of cell strings.

    ``rows`` holds ``(line number, cells)``. Returns ``(ids, grid, where)``
    where ``where[i][j]`` is the ``(line, column)`` of each body cell.
    """
    if not rows:
        raise ParseError("empty matrix block")
    head_line, header = rows[0]
    corner = bool(header) and header[0] == ""
    ids = header[1:] if corner else header
    n = len(ids)
    for col, fid in enumerate(ids, start=2 if corner else 1):
        if not fid:
            raise ParseError("empty factor id in header", head_line, col)
    if len(set(ids)) != n:
        raise ParseError("duplicate factor id in header", head_line)
    body = rows[1:]
    if len(body) != n:
        raise ParseError(f"matrix is not square: {n} header ids but {len(body)} body rows", head_line)
    grid, where = [], []
    for i, (lineno, row) in enumerate(body):
        if len(row) == n + 1:
            if row[0] != ids[i]:
                raise ParseError(f"row id {row[0]!r} does not match header id {ids[i]!r}", lineno, 1)
            cells, offset = row[1:], 2
        elif len(row) == n and not corner:
            cells, offset = row, 1
        else:
            raise ParseError(f"ragged row: expected {n} values, got {len(row) - corner}", lineno)
        grid.append(cells)
        where.append([(lineno, offset + j) for j in range(n)])
    return ids, grid, where


def _content_rows(text: str):
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line.strip():
            yield lineno, line


def parse_matrix(data, kind: str = "average") -> InfluenceMatrix:
    """Read a square numeric matrix CSV with factor-id headers."""
    rows = [
        (lineno, _csv_row(line, lineno))
        for lineno, line in _content_rows(_text(data))
        if not line.lstrip().startswith("#")
    ]
    ids, grid, where = _square_block(rows)
    if len(ids) < 2:
        raise ParseError("matrix needs at least 2 factors", rows[0][0])
    values = np.empty((len(ids), len(ids)))
    for i, cells in enumerate(grid):
        for j, cell in enumerate(cells):
            lineno, col = where[i][j]
            v = _parse_float(cell, lineno, col)
            if v < 0:
                raise ParseError(f"negative entry {cell}", lineno, col)
            if i == j and v != 0 and kind in ("average", "normalized"):
                raise DiagonalError(i, v, ids[i], f"line {lineno}, column {col}")
            values[i, j] = v
    return InfluenceMatrix(FactorSet.from_ids(ids), values, kind)


def _classify_cells(blocks) -> str:
    for _, grid, _ in blocks:
        for i, cells in enumerate(grid):
            for j, cell in enumerate(cells):
                if i == j:
                    continue
                try:
                    float(cell)
                except ValueError:
                    return LINGUISTIC
    return CRISP


def parse_survey(data, format: str = "csv", scale: LinguisticScale = DEFAULT_SCALE,
                 scale_max: int = 4) -> ExpertSurvey:
    """Read an expert survey and validate every cell.

    Crisp ratings must be integers in ``0..scale_max``; linguistic cells must be
    labels of ``scale``. Diagonals must be zero (or the scale's weakest term).
    """
    if format == "json":
        return _parse_survey_json(_text(data), scale, scale_max)
    if format != "csv":
        raise DematelError(f"unknown survey format {format!r}")
    text = _text(data)

    kind = None
    blocks_raw: list[tuple[int, str, list]] = []
    for lineno, line in _content_rows(text):
        stripped = line.strip()
        m = _EXPERT_RE.match(stripped)
        if m:
            blocks_raw.append((lineno, m.group(1).strip(), []))
            continue
        m = _KIND_RE.match(stripped)
        if m:
            if blocks_raw:
                raise ParseError("#kind must come before the first #expert block", lineno)
            kind = m.group(1).lower()
            if kind not in (CRISP, LINGUISTIC):
                raise ParseError(f"unknown survey kind {kind!r}", lineno)
            continue
        if stripped.startswith("#"):
            continue
        if not blocks_raw:
            raise ParseError("data before the first '#expert' line", lineno)
        blocks_raw[-1][2].append((lineno, _csv_row(line, lineno)))
    if not blocks_raw:
        raise ParseError("no '#expert' blocks found")

    blocks = []
    for lineno, _label, rows in blocks_raw:
        if not rows:
            raise ParseError("expert block has no rows", lineno)
        blocks.append(_square_block(rows))
    ids = blocks[0][0]
    for (lineno, _, rows), (bids, _, _) in zip(blocks_raw, blocks):
        if bids != ids:
            raise ParseError(f"factor ids {bids} differ from the first block's {ids}", rows[0][0])
    if len(ids) < 2:
        raise ParseError("survey needs at least 2 factors", blocks_raw[0][0])

    kind = kind or _classify_cells(blocks)
    responses = []
    for _, grid, where in blocks:
        matrix = []
        for i, cells in enumerate(grid):
            row = []
            for j, cell in enumerate(cells):
                lineno, col = where[i][j]
                row.append(_check_cell(cell, i, j, ids, kind, scale, scale_max, lineno, col))
            matrix.append(row)
        responses.append(matrix)
    return ExpertSurvey(FactorSet.from_ids(ids), tuple(responses), kind, scale)


def _check_cell(cell, i, j, ids, kind, scale, scale_max, line, col=None):
    where = f"cell [{ids[i]}][{ids[j]}]"
    if kind == CRISP:
        text = str(cell).strip() if not isinstance(cell, (int, float)) else cell
        if isinstance(text, bool):
            raise ParseError(f"{where}: rating {cell!r} is not an integer", line, col)
        if isinstance(text, float):
            if not text.is_integer():
                raise OutOfRangeError(f"{where}: rating {cell!r} is not an integer", line, col)
            value = int(text)
        elif isinstance(text, int):
            value = text
        elif _INT_RE.match(text):
            value = int(text)
        else:
            try:
                float(text)
            except ValueError:
                raise ParseError(f"{where}: non-numeric rating {cell!r} in a crisp survey", line, col) from None
            raise OutOfRangeError(f"{where}: rating {cell!r} is not an integer", line, col)
        if not 0 <= value <= scale_max:
            raise OutOfRangeError(
                f"{where}: rating {value} outside the integer scale 0..{scale_max} "
                f"(0 = no influence, {scale_max} = very high influence)",
                line,
                col,
            )
        if i == j and value != 0:
            raise DiagonalError(i, value, ids[i], _loc(line, col))
        return value
    label = str(cell).strip()
    if i == j:
        if label not in ("0", scale.zero_term):
            raise DiagonalError(i, label, ids[i], _loc(line, col))
        return scale.zero_term
    if label not in scale:
        err = UnknownTermError(label, scale.labels)
        raise ParseError(f"{where}: {err}", line, col) from err
    return label


def _loc(line, col):
    if isinstance(line, str):
        return line
    return f"line {line}, column {col}" if line is not None else ""


def _parse_survey_json(text, scale, scale_max) -> ExpertSurvey:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    if not isinstance(doc, dict):
        raise ParseError("survey JSON must be an object")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {version!r}")
    factors = doc.get("factors")
    if not isinstance(factors, list):
        raise ParseError("'factors' must be a list")
    ids, names = [], []
    for k, f in enumerate(factors):
        if isinstance(f, str):
            ids.append(f)
            names.append("")
        elif isinstance(f, dict) and isinstance(f.get("id"), str):
            ids.append(f["id"])
            names.append(str(f.get("name", "")))
        else:
            raise ParseError(f"factors[{k}] must be an id string or an object with 'id'")
    experts = doc.get("experts")
    if not isinstance(experts, list) or not experts:
        raise ParseError("'experts' must be a non-empty list of matrices")
    n = len(ids)
    kind = doc.get("kind")
    if kind is None:
        kind = LINGUISTIC if any(
            isinstance(c, str) and not _INT_RE.match(c.strip())
            for m in experts if isinstance(m, list)
            for row in m if isinstance(row, list)
            for c in row
        ) else CRISP
    if kind not in (CRISP, LINGUISTIC):
        raise ParseError(f"unknown survey kind {kind!r}")
    try:
        fs = FactorSet.from_ids(ids, names)
    except DematelError as exc:
        raise ParseError(f"factors: {exc}") from exc
    responses = []
    for k, m in enumerate(experts):
        if not isinstance(m, list) or len(m) != n:
            raise ParseError(f"experts[{k}] must have {n} rows")
        matrix = []
        for i, row in enumerate(m):
            if not isinstance(row, list) or len(row) != n:
                raise ParseError(f"experts[{k}][{i}]: ragged row, expected {n} values")
            matrix.append([
                _check_cell(c, i, j, ids, kind, scale, scale_max, f"experts[{k}][{i}][{j}]")
                for j, c in enumerate(row)
            ])
        responses.append(matrix)
    return ExpertSurvey(fs, tuple(responses), kind, scale)


def parse_edges(data, factor_set: FactorSet | None = None) -> ImpactRelationMap:
    """Read a manual edge list into an impact-relation map (no threshold)."""
    order: list[str] = list(factor_set.ids) if factor_set else []
    fixed = factor_set is not None
    edges: list[Edge] = []
    allow_self = False
    first = True
    for lineno, line in _content_rows(_text(data)):
        stripped = line.strip()
        m = _FACTORS_RE.match(stripped)
        if m:
            if fixed:
                raise ParseError("factor order given twice", lineno)
            order = [c for c in _csv_row(m.group(1), lineno) if c]
            fixed = True
            continue
        if stripped.startswith("#"):
            continue
        row = _csv_row(line, lineno)
        if first and [c.lower() for c in row[:2]] == ["source", "target"]:
            first = False
            continue
        first = False
        if len(row) not in (2, 3) or not row[0] or not row[1]:
            raise ParseError("expected 'source,target[,weight]'", lineno)
        weight = _parse_float(row[2], lineno, 3) if len(row) == 3 and row[2] else None
        for col, fid in ((1, row[0]), (2, row[1])):
            if fid not in order:
                if fixed:
                    raise ParseError(f"unknown factor {fid!r}", lineno, col)
                order.append(fid)
        if row[0] == row[1]:
            allow_self = True
        edges.append(Edge(row[0], row[1], weight))
    try:
        return ImpactRelationMap(FactorSet.from_ids(order), tuple(edges), None, allow_self)
    except DematelError as exc:
        raise ParseError(str(exc)) from exc


def format_matrix_csv(m: InfluenceMatrix) -> bytes:
    """Matrix CSV at full precision; ``parse_matrix`` reads it back exactly."""
    buf = StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([""] + list(m.ids))
    for fid, row in zip(m.ids, m.values):
        w.writerow([fid] + [repr(float(x)) for x in row])
    return buf.getvalue().encode("utf-8")


def _matrix_block(m: InfluenceMatrix | None, digits: int):
    if m is None:
        return None
    return {
        "kind": m.kind,
        "values": m.values.tolist(),
        "display": [[round_half_away(x, digits) for x in row] for row in m.values],
    }


def _score_rows(bundle: AnalysisBundle, digits: int) -> list[dict]:
    rows = []
    for row in bundle.scores.rows():
        out = dict(row)
        for key in ("r", "c", "prominence", "relation"):
            out[f"{key}_display"] = round_half_away(row[key], digits)
        rows.append(out)
    return rows


def report_dict(bundle: AnalysisBundle) -> dict:
    cfg = bundle.config
    digits = cfg.digits
    return {
        "schema_version": SCHEMA_VERSION,
        "toolkit": {"name": "fuzzydematel", "version": __version__},
        "config": cfg.to_dict(),
        "source": bundle.source,
        "experts": bundle.experts,
        "factors": [{"id": f.id, "name": f.name} for f in bundle.factor_set],
        "s": bundle.s,
        "s_display": None if bundle.s is None else round_half_away(bundle.s, digits),
        "matrices": {
            "average": _matrix_block(bundle.average, digits),
            "normalized": _matrix_block(bundle.normalized, digits),
            "total": _matrix_block(bundle.total, digits),
        },
        "scores": _score_rows(bundle, digits),
        "causes": bundle.scores.causes(),
        "effects": bundle.scores.effects(),
        "threshold": {
            "value": bundle.threshold,
            "display": round_half_away(bundle.threshold, digits),
            "mode": "auto" if cfg.auto_threshold else "explicit",
        },
        "edges": [
            {
                "source": e.source,
                "target": e.target,
                "weight": e.weight,
                "weight_display": None if e.weight is None else round_half_away(e.weight, digits),
            }
            for e in bundle.irm.edges
        ],
        "cycles": [list(c) for c in bundle.loops.cycles],
        "cycle_count": bundle.loops.count,
        "truncated": bundle.loops.truncated,
        "structure": [
            {"factor": s.factor, "relations": s.relations, "loops": s.loops, "rank": s.rank}
            for s in bundle.structure
        ],
    }


def export_report(bundle: AnalysisBundle, format: str = "json") -> bytes:
    """Serialize a bundle as JSON or as sectioned CSV (``#section <name>`` headers)."""
    if format == "json":
        text = json.dumps(report_dict(bundle), indent=2, ensure_ascii=False) + "\n"
        return text.encode("utf-8")
    if format != "csv":
        raise DematelError(f"unknown report format {format!r}")
    return _report_csv(bundle).encode("utf-8")


def _report_csv(bundle: AnalysisBundle) -> str:
    digits = bundle.config.digits
    buf = StringIO()
    w = csv.writer(buf, lineterminator="\n")

    def section(name):
        if buf.tell():
            buf.write("\n")
        buf.write(f"#section {name}\n")

    section("summary")
    w.writerow(["key", "value"])
    w.writerow(["schema_version", SCHEMA_VERSION])
    w.writerow(["toolkit_version", __version__])
    w.writerow(["source", bundle.source])
    w.writerow(["experts", "" if bundle.experts is None else bundle.experts])
    w.writerow(["s", "" if bundle.s is None else repr(bundle.s)])
    w.writerow(["threshold", repr(bundle.threshold)])
    w.writerow(["cycle_count", bundle.loops.count])
    w.writerow(["truncated", str(bundle.loops.truncated).lower()])

    section("config")
    w.writerow(["key", "value"])
    for key, value in bundle.config.to_dict().items():
        w.writerow([key, "" if value is None else value])

    for name, m in (("average", bundle.average), ("normalized", bundle.normalized),
                    ("total", bundle.total)):
        if m is None:
            continue
        section(name)
        buf.write(format_matrix_csv(m).decode("utf-8"))

    section("scores")
    w.writerow(["factor", "r", "c", "prominence", "relation", "class",
                "r_display", "c_display", "prominence_display", "relation_display"])
    for row in _score_rows(bundle, digits):
        w.writerow([row["factor"], repr(row["r"]), repr(row["c"]), repr(row["prominence"]),
                    repr(row["relation"]), row["class"], row["r_display"], row["c_display"],
                    row["prominence_display"], row["relation_display"]])

    section("edges")
    w.writerow(["source", "target", "weight", "weight_display"])
    for e in bundle.irm.edges:
        if e.weight is None:
            w.writerow([e.source, e.target, "", ""])
        else:
            w.writerow([e.source, e.target, repr(e.weight), round_half_away(e.weight, digits)])

    section("cycles")
    w.writerow(["length", "cycle"])
    for cyc in bundle.loops.cycles:
        w.writerow([len(cyc), " -> ".join(cyc + (cyc[0],))])

    section("structure")
    w.writerow(["factor", "relations", "loops", "rank"])
    for s in bundle.structure:
        w.writerow([s.factor, s.relations, s.loops, s.rank])
    return buf.getvalue()


_DOT_STYLE = {
    "cause": 'shape=box, style="filled,bold", fillcolor="#f4cccc"',
    "effect": 'shape=ellipse, style=filled, fillcolor="#cfe2f3"',
    "neutral": 'shape=ellipse, style=dashed',
}


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _num(x: float, digits: int) -> str:
    return f"{round_half_away(x, digits):.{digits}f}"


def export_dot(irm: ImpactRelationMap, scores=None, digits: int = 2) -> bytes:
    """Graphviz digraph of the map.

    Node labels carry ``(r+c, r-c)`` when ``scores`` is given; cause, effect
    and neutral factors get distinct shapes and fills.
    """
    lines = ["digraph IRM {", "  rankdir=LR;", '  node [fontname="Helvetica"];']
    if irm.threshold is not None:
        lines.append(f'  label="threshold p = {_num(irm.threshold, digits)}";')
    classes = scores.classes if scores is not None else None
    for k, fid in enumerate(irm.factor_set.ids):
        if scores is None:
            lines.append(f"  {_dot_id(fid)} [label={_dot_id(fid)}];")
            continue
        label = (f"{fid}\\n({_num(scores.prominence[k], digits)}, "
                 f"{_num(scores.relation[k], digits)})")
        lines.append(f'  {_dot_id(fid)} [label="{label}", {_DOT_STYLE[classes[k]]}];')
    for e in irm.edges:
        attrs = f" [label={_dot_id(_num(e.weight, digits))}]" if e.weight is not None else ""
        lines.append(f"  {_dot_id(e.source)} -> {_dot_id(e.target)}{attrs};")
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")
